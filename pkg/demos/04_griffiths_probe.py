"""Determinants of Griffiths-positive 2x2 matrices of (1,1)-forms on C^4.

The run is exploratory: the probe reports margins and flags trials whose
r=0 margin is small, it does not decide the open question.  Near-degenerate
samples show how small the margin can get while staying Nakano positive.

Run: python demos/04_griffiths_probe.py
"""
from lkit.experiments import run_griffiths

generic = run_griffiths(4, 2, 1, 1, trials=20, seed=1)
print("generic:       ", generic.aggregate)

diagonal = run_griffiths(4, 2, 1, 1, trials=20, seed=1, diagonal=True)
print("diagonal:      ", diagonal.aggregate)

near = run_griffiths(4, 2, 1, 1, trials=20, seed=1, degenerate_eps=1e-4, watch=1e-6)
print("near-degenerate:", near.aggregate)
