# # Bias under colored process noise
#
# Here q(t) is itself an AR(1) process, q(t) = -0.5 q(t-1) + eta(t). The
# least-squares fit still converges, but to the optimum of the colored
# covariance, which is nowhere near the white-noise value of 1/9.

import numpy as np

from arident.ar import optimal_ar1, optimal_ar2
from arident.least_squares import batch_estimate
from arident.moments import colored_covariance
from arident.noise import NoiseSpec
from arident.system import SystemParams

params = SystemParams(1 / 3, NoiseSpec.colored(-0.5, 1.0), NoiseSpec.white(0.0, 9.0))

# In[1]:

cov = colored_covariance(params, 4)
print("psi(tau):", cov.values)
print("limit of AR(1):", optimal_ar1(cov).coeffs, " (-1/47 =", -1 / 47, ")")
print("limit of AR(2):", optimal_ar2(cov).coeffs, " (+-1/48 =", 1 / 48, ")")

# In[2]:

s = batch_estimate(params, 1, 100_000, kappa=100, master_seed=2024, workers=4)
print("empirical AR(1) mean:", s.emp_mean[0])
print("distance from 1/9:", abs(s.emp_mean[0] - 1 / 9))

# In[3]:

s2 = batch_estimate(params, 2, 100_000, kappa=100, master_seed=2024, workers=4)
print("empirical AR(2) mean:", s2.emp_mean)
print("distance from the colored optimum:", np.abs(s2.emp_mean - optimal_ar2(cov).coeffs))
