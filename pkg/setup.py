from setuptools import setup, find_packages

setup(
    name="twosite",
    version="0.1.0",
    description="Heat transport through two coupled sites attached to dephasing baths",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.7",        # expm, null_space-style SVD, expit
        "click>=8.0",
        "rich>=12.0",        # colored terminal output
    ],
    extras_require={
        "dev": [
            "pytest>=7.0",
        ]
    },
    entry_points={
        "console_scripts": [
            "twosite=twosite.cli.main:cli",
        ],
    },
)
