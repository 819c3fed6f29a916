from CRSP.version import __version__
