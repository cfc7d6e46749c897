from fractions import Fraction

from hypothesis import strategies as st

small_fractions = st.builds(
    Fraction,
    st.integers(min_value=-40, max_value=40),
    st.integers(min_value=1, max_value=6),
)


def distinct_fractions(min_size=2, max_size=6):
    return st.lists(small_fractions, min_size=min_size, max_size=max_size, unique=True)
