from setuptools import setup, find_packages

setup(
    name="coalition-lattice",
    version="0.1.0",
    description="Attribution, interaction and submodularity analysis over coalition lattices",
    author="Your Name",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    package_data={
        "src.reporting": ["templates/*.j2"],
    },
    install_requires=[
        "pydantic==2.5.3",
        "pydantic-settings==2.1.0",
        "python-dotenv==1.0.0",
        "jinja2==3.1.2",
        "cachetools==5.3.0",
        "numpy==1.26.3",
        "scipy==1.11.4",
    ],
    python_requires=">=3.8",
    extras_require={
        "dev": [
            "pytest==7.4.4",
        ],
    },
    entry_points={
        "console_scripts": [
            "coalition-lattice=src.main:main",
        ],
    },
)
