from .mirror import mirror
from .staircase import staircase
from .weighted import weighted
