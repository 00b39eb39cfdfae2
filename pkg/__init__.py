"""MC Dropout Lab

Small dense dropout networks and the experiments around their
Monte-Carlo dropout variance:
- Network engine with explicit dropout masks and exact gradients
- Adam training with MSE loss
- Closed-form single-layer moments and an enumeration oracle
- Monte-Carlo dropout estimation
- Config-driven experiment runners, report tables and a CLI
"""
from core import *
from models import *
from optimization import *
from generators import *

__version__ = '0.1.0'
