from setuptools import setup, find_packages

with open("README.md", "r") as fh:
    LONG_DESCRIPTION = fh.read()

TESTS_REQUIRE = [
    "pytest",
    "pylint",
    "mock",
    "black>=20.8b1",
    "bandit",
    "pytest-xdist",
]

setup(
    name="nsdde-milstein",
    description="Tamed Milstein simulation and convergence experiments for neutral "
    "stochastic delay differential equations",
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    package_data={
        "nsdde_milstein": ["_datainput/problem_data/*.json"],
    },
    entry_points={
        "console_scripts": ["nsdde = nsdde_milstein._cli:main"],
    },
    install_requires=[
        "numpy>=1.17",
        "pandas>=1.5",
        "pyyaml>=5.1",
        "scipy>=1.2",
    ],
    tests_require=TESTS_REQUIRE,
    extras_require={"tests": TESTS_REQUIRE},
    setup_requires=["setuptools_scm~=3.2"],
    python_requires="~=3.8",
    use_scm_version=True,
    zip_safe=False,
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Natural Language :: English",
        "Environment :: Console",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
