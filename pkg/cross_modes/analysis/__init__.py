from .decay import *
from .fits import *
from .sweeps import *
