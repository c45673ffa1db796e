# coding: utf-8

# # Classifying knots in stages
#
# A knot is settled as soon as one truncation G_k(K) is proven finite. The
# default configuration tries coset enumeration at k = 0, then completion at
# k = 0, 1 and 2.

# In[1]:

from fourmove import StageConfig, classify, parse_gauss_code
from fourmove import knuthbendix as kb
from fourmove import pipeline
from fourmove import toddcoxeter as tc

for s in StageConfig.default().stages:
    print(s.describe())


# In[2]:

v = classify(parse_gauss_code("1,2,3,4,2,1,4,3"))
print(v.to_json())


# The bundled census holds the 46 codes that resisted these stages. With the
# default limits a full run takes many hours, so here is a run with small
# budgets. Results are written as JSON lines, in input order.

# In[3]:

import json
import tempfile
from pathlib import Path

from fourmove import census_path, run_census

quick = StageConfig((
    pipeline.Stage("tc", 0, tc.TcLimits(20_000)),
    pipeline.Stage("kb", 0, kb.KbLimits(max_rules=2_000, max_seconds=None)),
))
out = Path(tempfile.mkdtemp()) / "quick.jsonl"
report = run_census(census_path(), quick, workers=1, output_path=out)
print(report)


# In[4]:

rows = [json.loads(l) for l in out.read_text().splitlines()]
print(rows[0]["stages"])


# A recorded run with the default limits ships with the tests.

# In[5]:

recorded = Path(__file__).resolve().parent.parent / "tests" / "data" / "census_default.jsonl"
if recorded.exists():
    rows = [json.loads(l) for l in recorded.read_text().splitlines()]
    print(len(rows), "knots,", sum(r["status"] == "unresolved" for r in rows), "unresolved")
    for s in rows[0]["stages"]:
        print(s)
