from setuptools import find_packages, setup

setup(
    name="bloch",
    packages=find_packages(exclude=["tests"]),
    entry_points={"console_scripts": ["bloch = bloch.cli:main"]},
)
