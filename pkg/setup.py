#!/usr/bin/env python3
"""
Setup script for the Game Logic Workbench
"""

from setuptools import setup, find_packages
from pathlib import Path

# Read README
readme_path = Path(__file__).parent / "README.md"
with open(readme_path, "r", encoding="utf-8") as f:
    long_description = f.read()

# Read requirements: runtime pins come first, optional sections go to the dev extra
requirements_path = Path(__file__).parent / "requirements.txt"
requirements, dev_requirements = [], []
with open(requirements_path, "r", encoding="utf-8") as f:
    target = requirements
    for line in f:
        line = line.strip()
        if line.startswith("#") and "(optional)" in line:
            target = dev_requirements
        elif line and not line.startswith("#"):
            target.append(line)

setup(
    name="glwb",
    version="1.0.0",
    author="Game Logic Workbench",
    description="Model checking, translation and proof checking for sabotage game logic",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    py_modules=["main"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
    install_requires=requirements,
    extras_require={
        "dev": dev_requirements,
    },
    entry_points={
        "console_scripts": [
            "glwb=main:main",
        ],
    },
    data_files=[
        ("config", ["config/default.yaml"]),
        ("proofs", sorted(str(p) for p in Path("proofs").glob("*.proof"))),
    ],
    zip_safe=False,
    keywords="game logic sabotage modal fixpoint chop model checking proof checking",
)
