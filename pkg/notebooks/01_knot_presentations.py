# coding: utf-8

# # From a Gauss code to a finite presentation
#
# An alternating knot diagram is read off as a Gauss code: walk along the
# knot and write down the label of each crossing you pass. Odd positions are
# overcrossings. Each crossing gives one relator of length four, and every
# generator squares to the identity.

# In[1]:

from fourmove import (abelianization_invariants, build_Gk, census_path,
                      knot_presentation, parse_gauss_code, wirtinger_relators)
from fourmove.fpgroup import format_word

trefoil = parse_gauss_code("1,2,3,1,2,3")
trefoil


# In[2]:

for r in wirtinger_relators(trefoil):
    print(format_word(r))


# Bad input is rejected with the offending position.

# In[3]:

try:
    parse_gauss_code("1,2,1,2")
except ValueError as e:
    print(e)


# # Truncations
#
# build_Gk layers the relators (a w b w^-1)^4 on top of the knot relators,
# for every pair of generators and every conjugator w of length at most k.
# The count grows quickly with k.

# In[4]:

base = knot_presentation(trefoil)
for k in range(4):
    p = build_Gk(base, k)
    print(k, len(p.relators), p.total_length)


# The abelianization of every truncation is Z/2: each generator maps to the
# same involution.

# In[5]:

codes = census_path().read_text().split()
big = parse_gauss_code(codes[0])
print(big.crossings, "crossings")
for k in range(3):
    p = build_Gk(knot_presentation(big), k)
    print(k, len(p.relators), abelianization_invariants(p))
