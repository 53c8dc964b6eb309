"""Actor-critic learning, logit equilibria and best-response dynamics for
continuous-action potential games (Python bindings over the C++ core)."""

from logitac._core import *  # noqa: F401,F403
from logitac._core import __doc__  # noqa: F401
