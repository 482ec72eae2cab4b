import os
import sys

# Make the sibling helper modules importable regardless of invocation dir.
sys.path.insert(0, os.path.dirname(__file__))
