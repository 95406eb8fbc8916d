from setuptools import setup, find_packages

setup(
    name="asrscale",
    version="0.1",
    packages=find_packages(include=["asrscale", "asrscale.*"]),
    include_package_data=True,
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.9",
        "pandas>=1.5",
        "matplotlib>=3.6",
        "jiwer>=3.0",
    ],
    package_data={"asrscale.store": ["data/*.csv"]},
    entry_points={"console_scripts": ["asrscale = asrscale.cli.main:main"]},
)
