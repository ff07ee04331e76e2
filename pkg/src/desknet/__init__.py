"""desknet: a desk-scale neural network trainer you can steer live.

Dense and convolutional classifiers built from first principles (explicit
forward/backward passes, no autodiff framework), with seeded determinism
end to end, an MNIST/CIFAR-10 experiment harness, and a line-delimited
JSON control protocol for steering a running training session.
"""

__version__ = "0.1.0"

from .errors import DesknetError
from .rng import RandomSource
from .tensor import Tensor

__all__ = ["DesknetError", "RandomSource", "Tensor", "__version__"]
