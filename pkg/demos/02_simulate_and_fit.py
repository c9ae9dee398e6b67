# # Simulating trajectories and fitting by least squares
#
# Trajectories are generated from seeded streams so every number below is
# reproducible. A single fit is noisy. Averaging over many independent
# batches shows the estimator settling on the optimum from the theory demo.

import numpy as np

from arident.least_squares import batch_estimate, fit_ar, running_moments
from arident.moments import sample_autocovariance, theoretical_covariance
from arident.noise import SeededStream
from arident.system import SystemParams, simulate

params = SystemParams.white(1 / 3, 4.0, 9.0)

# In[1]:

traj = simulate(params, 200_000, stream=SeededStream(seed=1))
print("sample covariance:", np.round(sample_autocovariance(traj.values, 2).values, 3))
print("theory:           ", theoretical_covariance(params).values)

# In[2]:

one = fit_ar(simulate(params, 1000, stream=SeededStream(7)), order=1)
print("single run, N=1000:", one.coeffs)

# In[3]:

for n in (1000, 2000):
    s = batch_estimate(params, 1, n, kappa=100, master_seed=2024)
    print(f"N={n}: mean {s.emp_mean[0]:.4f}  variance {float(s.emp_variance):.5f}")

# Doubling N roughly halves the spread of the estimates.

# In[4]:

s2 = batch_estimate(params, 2, 1000, kappa=100, master_seed=2024, workers=4)
print("AR(2) batch mean:", s2.emp_mean)
print("AR(2) batch covariance:\n", s2.emp_variance)

# In[5]:

means, variances = running_moments(s2.estimates)
for k in (0, 9, 49, 99):
    print(f"after {k + 1:3d} batches: mean {means[k]}, var {variances[k]}")
