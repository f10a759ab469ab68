from setuptools import setup

setup(
    author="ordertau contributors",
    classifiers=[
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics"
    ],
    message_extractors = {
        'ordertau': [('**.py', 'python', None),],
    },
    license="GPLv3",
    description="Exact and Monte Carlo values of Kendall's tau for copulas and their order transforms.",
    long_description="Exact rational and Monte Carlo values of Kendall's tau for copulas and their order-statistic transforms.",
    install_requires=["attrs>=18.1", "numpy>=1.17", "joblib>=0.14", "pyyaml<7", "setuptools", "termcolor>=1.1", "jellyfish>=0.8"],
    extras_require = {
        "develop": ["sphinx", "sphinx-autobuild", "sphinx_rtd_theme"]
    },
    entry_points={
        "console_scripts": ["ordertau=ordertau.cli:main"]
    },
    keywords=["copula", "kendall", "order statistics"],
    name="ordertau",
    python_requires=">= 3.9",
    packages=["ordertau"],
    package_data={"ordertau": ["presets.yml"]},
    version="1.0.0",
    include_package_data=True
)
