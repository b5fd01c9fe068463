from fractions import Fraction

from hypothesis import strategies as st

from wsrpt.core import Instance, Job


@st.composite
def small_instances(draw, max_jobs: int = 5):
    """Half-integer instances matching the random generator's value range."""
    n = draw(st.integers(min_value=1, max_value=max_jobs))
    jobs = []
    for i in range(n):
        r = Fraction(draw(st.integers(min_value=0, max_value=6)), 2)
        p = Fraction(draw(st.integers(min_value=1, max_value=6)), 2)
        w = Fraction(draw(st.integers(min_value=1, max_value=6)), 2)
        jobs.append(Job(i, r, p, w))
    return Instance(tuple(jobs))
