"""lwekit: torus-LWE sample transformations and exact Gaussian sampling.

The package implements, at desk scale, a family of distribution
transformations on learning-with-errors sample batches (normal form,
first-is-errorless, extended LWE with noise hints, modulus-dimension
switching, binary-secret hybrids) together with exact discrete Gaussian
samplers and a statistical harness that checks each transformation's output
distribution against its claimed closeness budget.
"""

from .backend import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
