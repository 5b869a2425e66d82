"""Static figures from vibronic-dimer sweep CSV files.

Three figure kinds: (Omega, S) heatmaps of yield and inter-site
coherence, yield-vs-frequency line panels, and dynamics time-series
panels.  Consumes only the documented CSV schema plus the optional
metadata sidecar; rendering is deterministic (no timestamps embedded).
"""

from .figures import FigureSpec, SchemaError, render

__version__ = "0.1.0"
