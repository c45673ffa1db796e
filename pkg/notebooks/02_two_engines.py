# coding: utf-8

# # Coset enumeration and completion side by side
#
# Two independent ways to find the order of a finitely presented group:
# Todd-Coxeter fills in a table of cosets of the trivial subgroup, and
# Knuth-Bendix builds a confluent rewriting system whose irreducible words
# are one per element. Where both finish they must agree.

# In[1]:

import time

import numpy as np

from fourmove import Presentation, build_Gnk
from fourmove import knuthbendix as kb
from fourmove import toddcoxeter as tc

d8 = build_Gnk(2, 0)          # <a, b | a^2, b^2, (ab)^4>
enum = tc.order(d8)
comp = kb.complete(d8)
print(enum, "|", comp.status, comp.system.count_irreducible())


# The coset table is a plain integer array; row c, column x is c.x

# In[2]:

enum.table.action


# Every relator closes at every coset.

# In[3]:

ident = np.arange(enum.index)
all(np.array_equal(enum.table.trace_all(r), ident) for r in d8.relators)


# In[4]:

for lhs, rhs in comp.system.rules:
    print(lhs, "->", rhs)


# # The groups G_{3,k}
#
# Three involutions with (a w b w^-1)^4 = 1 for |w| <= k. At k = 0 this is an
# infinite triangle group; completion proves it by finding a confluent
# system with infinitely many normal forms.

# In[5]:

comp = kb.complete(build_Gnk(3, 0))
comp.status, comp.system.count_irreducible()


# A few more conjugators make the group finite. The probe staggers coset
# budgets across k so that a small finite truncation is found early.

# In[6]:

from fourmove import probe_gn

res = probe_gn(3, 5, progress=lambda a: print(a.round, a.depth, a.budget, a.result))
print(res)


# In[7]:

for k in range(2, 6):
    t0 = time.monotonic()
    print(k, tc.order(build_Gnk(3, k)), f"{time.monotonic() - t0:.2f}s")


# Completion agrees, with a system of a few hundred rules.

# In[8]:

t0 = time.monotonic()
comp = kb.complete(build_Gnk(3, 5))
print(comp.status, len(comp.system), comp.system.count_irreducible(),
      f"{time.monotonic() - t0:.1f}s")
