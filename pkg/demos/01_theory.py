# # Stationary moments and optimal AR predictors
#
# The system under study is a first-order recursion observed through white
# measurement noise:
#
#     x(t) = lam * x(t-1) + q(t),    y(t) = x(t) + v(t)
#
# Everything in this script is deterministic. We compute the covariance
# sequence of y and the AR(1)/AR(2) predictors that minimise the
# one-step-ahead mean-squared error.

import numpy as np

from arident.ar import closed_form_white, optimal_ar1, optimal_ar2, prediction_cost
from arident.moments import theoretical_covariance
from arident.system import SystemParams

# In[1]:

params = SystemParams.white(lam=1 / 3, delta2=4.0, xi2=9.0)
cov = theoretical_covariance(params, tau_max=5)
print("psi(tau), tau = 0..5:", np.round(cov.values, 6))

# The tail is geometric with ratio lam; only lag 0 carries the measurement noise.

print("ratios psi(t+1)/psi(t):", cov.values[2:] / cov.values[1:-1])

# In[2]:

ar1 = optimal_ar1(cov)
ar2 = optimal_ar2(cov)
print("AR(1):", ar1.coeffs, "error variance", ar1.pred_error_variance)
print("AR(2):", ar2.coeffs, "error variance", ar2.pred_error_variance)

# The measurement noise pulls the AR(1) coefficient far below lam = 1/3.
# Adding a second lag helps only a little.

# In[3]:

# The closed-form expressions give the same numbers by a different route.
for order in (1, 2):
    cf = closed_form_white(params, order)
    print(order, cf.coeffs, cf.pred_error_variance)

# In[4]:

# A coarse scan of the AR(1) cost confirms the minimiser.
phis = np.linspace(-0.5, 0.7, 13)
costs = [prediction_cost(cov, [p]) for p in phis]
for p, c in zip(phis, costs):
    print(f"phi = {p:+.2f}   cost = {c:.4f}")

# In[5]:

# With non-zero noise means the predictor has no intercept, so it also
# has to track the level of y. The optimum moves a long way.
shifted = SystemParams.white(1 / 3, 4.0, 9.0, qbar=1.0, vbar=4.0)
cov_s = theoretical_covariance(shifted)
print("mean of y:", cov_s.mean)
print("AR(1) with mean:", optimal_ar1(cov_s).coeffs)
print("AR(2) with mean:", optimal_ar2(cov_s).coeffs)
