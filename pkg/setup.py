from setuptools import setup, find_packages

with open("README.md") as fh:
    description = fh.read()

setup(
    name="rectiforge",
    version="0.1.0",
    packages=find_packages(include=["rectiforge", "rectiforge.*"]),
    description="RectiForge: harmonic-balance simulator and matching optimizer for RF rectifiers",
    long_description=description,
    long_description_content_type="text/markdown",
    install_requires=[
        "numpy<2.0",
        "pandas",
        "pint",
        "pyyaml",
        "scipy",
        "networkx",
        "scikit-rf",
    ],
    entry_points={"console_scripts": ["rectiforge=rectiforge.cli:main"]},
    include_package_data=True,
    package_data={
        "rectiforge": [
            "inputdata/config/*.yaml",
            "inputdata/netlists/*.net",
            "inputdata/optspecs/*.yaml",
            "inputdata/reference/*.yaml",
        ]
    },
)
