import numpy as np
from hypothesis import strategies as st

from nullcurves.dynamics import PhaseState
from nullcurves.e21 import AlgebraElement, CoalgebraElement, exp_algebra

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
small = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
vectors = st.lists(finite, min_size=3, max_size=3).map(np.array)
coeffs = st.lists(small, min_size=6, max_size=6).map(np.array)
algebra = coeffs.map(AlgebraElement.from_coeffs)
coalgebra = st.lists(small, min_size=6, max_size=6).map(lambda x: CoalgebraElement.from_vector(np.array(x)))
groups = coeffs.map(lambda c: exp_algebra(AlgebraElement.from_coeffs(c)))
masses = st.sampled_from([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
states = st.builds(PhaseState, masses, small, small, small)
