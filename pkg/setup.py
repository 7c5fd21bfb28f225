from setuptools import setup, find_packages

setup(
    name="bridgecraft",
    version="0.1.0",
    packages=find_packages(exclude=("tests",)),
    install_requires=[line.strip() for line in open("requirements.txt").readlines() if line.strip()],
    entry_points={
        "console_scripts": [
            "bridgecraft=bridgecraft.main:run",
        ],
    },
    python_requires=">=3.10",
)
