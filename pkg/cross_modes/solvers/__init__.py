from .base import *
from .wrappers import *
