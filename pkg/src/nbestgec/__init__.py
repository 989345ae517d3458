"""Edit-level classification for correcting learner English from n-best lists.

The package extracts phrase edits from decoder hypotheses, scores them with a
confidence-weighted classifier, and either reranks the hypotheses with the
averaged edit score or greedily assembles a correction from the best
non-overlapping edits.
"""

from .align import Edit, apply_edits, extract_edits
from .corpus import AnnotatedSentence, GoldEdit, NBestEntry, NBestList
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AnnotatedSentence",
    "Edit",
    "GoldEdit",
    "NBestEntry",
    "NBestList",
    "apply_edits",
    "extract_edits",
]
