import os
import sys
from setuptools import setup, find_packages

here = os.path.abspath(os.path.dirname(__file__))
sys.path.insert(0, os.path.join(here, "CRSP"))
from version import __version__

setup(
    name="CRSP",
    description="strike planning for a Cartesian ping-pong robot with particle swarm optimization",
    version=__version__,
    packages=find_packages(exclude=("tests", "tests.*")),
    package_data={"CRSP.data": ["scenarios/*.json"]},
    install_requires=[
        "joblib >= 1.3.0",
        "matplotlib >= 3.7.2",
        "numpy >= 1.24.3",
        "pandas >= 2.0.3",
        "scipy >= 1.11.2",
        "tqdm >= 4.66.1",
    ],
    extras_require={"test": ["pytest >= 7.4.0"]},
    entry_points={"console_scripts": ["crsp = CRSP.cli:main"]},
    license_files=("LICENSE"),
)
