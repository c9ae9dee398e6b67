# # Running scenario files
#
# Scenario files are plain INI text with one `[scenario.<name>]` section per
# experiment. The bundled `paper.cfg` holds the full reference suite. The same
# runs are available from the shell:
#
#     arident reproduce --config paper.cfg --out results/
#     arident series --config paper.cfg --scenario white-ar2-2N --out series.csv

from arident.repro import cmd_reproduce, cmd_series, load_config, parse_config, select

# In[1]:

text = """
[scenario.quick]
lambda = 0.5
q_variance = 1
v_variance = 1
order = 2
n = 2000
kappa = 50
seed = 3
mean_tol = 0.02
"""
[quick] = parse_config(text)
reports, status = cmd_reproduce([quick])
print("exit status:", status)
print(reports[0].to_json(with_timestamp=False)[:600])

# In[2]:

suite = load_config("paper.cfg")
print([s.name for s in suite])
reports, status = cmd_reproduce(suite, workers=2)
for r in reports:
    print("PASS" if r.passed else "FAIL", r.scenario.name)

# In[3]:

csv_text = cmd_series(select(suite, "white-ar1-N"))
print("\n".join(csv_text.splitlines()[:5]))
