"""Clustering hyperparameter selection without labels.

Thin Python surface over the C++ core: ensemble generation, consensus
clustering, NMI/ANMI scoring and the usual cluster validity indices.
"""

try:
    from ._clustsel import *  # noqa: F401,F403  (installed package layout)
    from ._clustsel import __version__  # noqa: F401
except ImportError:  # build-tree layout: _clustsel.so directly on sys.path
    from _clustsel import *  # noqa: F401,F403
    from _clustsel import __version__  # noqa: F401
