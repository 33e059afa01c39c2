import glob
from setuptools import find_packages, setup

if __name__ == "__main__":
    setup(
        name="otdro",
        version="0.1.0",
        packages=find_packages(exclude=("tests", "tests.*", "*.tests", "*.tests.*")),
        url="",
        license="",
        author="",
        author_email="",
        description="Certified dual values and finite-sample bounds for "
        "optimal-transport distributionally robust optimization",
        install_requires=[
            "numpy>=1.22",
            "scipy>=1.8",
            "pandas>=1.4",
            "matplotlib>=3.5",
        ],
        scripts=list(
            filter(lambda s: "init" not in s, glob.glob("scripts/*.py"))
        ),
    )
