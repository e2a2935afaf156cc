"""Recovery of sparse cosine sums from equidistant samples.

ESPRIT works on a Toeplitz+Hankel pencil of the samples. The two ESPIRA
variants work on DCT-II data, either by AAA rational interpolation or by a
Loewner matrix pencil. A Prony-type direct solver serves as a reference.
"""

from .model import (EXAMPLE1, CosineSum, ErrorReport, SampleVector, SamplingGrid,
                    add_noise, evaluate, random_cosine_sum, relative_errors, sample,
                    snr_psnr)
from .esprit import EspritConfig, RecoveryError, esprit_recover
from .espira import espira1_recover, espira2_recover
from .oracle import prony_solve
from .estimators import EspiraI, EspiraII, Esprit, Prony

__version__ = "0.1.0"

__all__ = [
    "EXAMPLE1", "CosineSum", "ErrorReport", "SampleVector", "SamplingGrid",
    "add_noise", "evaluate", "random_cosine_sum", "relative_errors", "sample",
    "snr_psnr", "EspritConfig", "RecoveryError", "esprit_recover",
    "espira1_recover", "espira2_recover", "prony_solve",
    "Esprit", "EspiraI", "EspiraII", "Prony",
]
