"""manymt: corpus-to-training-schedule toolkit for many-to-many MT systems.

Covers corpus preprocessing, upsampled subword training, temperature and
chi-square-DRO sampling weights, tagged synthetic data, language-family
routing, a desk-scale multi-task trainer, beam-search decoding, and
spBLEU/ChrF++ evaluation — everything wired together by the ``manymt`` CLI.
"""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
