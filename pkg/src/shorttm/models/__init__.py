from .aggregation import PTM, SATM
from .base import TopicModel
from .cooccurrence import BTM, WNTM
from .dmm import GPUDMM, GPUPDMM, GSDMM, LFDMM
from .lda import LDA

REGISTRY = {cls.name: cls for cls in (LDA, GSDMM, LFDMM, GPUDMM, GPUPDMM, BTM, WNTM, SATM, PTM)}

__all__ = ["REGISTRY", "TopicModel", "LDA", "GSDMM", "LFDMM", "GPUDMM", "GPUPDMM", "BTM",
           "WNTM", "SATM", "PTM"]
