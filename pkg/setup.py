from setuptools import setup


setup(
    name="regqaoa",
    version="0.3.0",
    description="QAOA-style ansatz energies on high-girth regular graphs",
    long_description=(
        "Exact per-edge energies of the MC and XY ansatze on quantum MaxCut, "
        "XY, EPR and MaxCut Hamiltonians over (D+1)-regular graphs of large "
        "girth, their infinite-degree limits and classical baselines"
    ),
    classifiers=[
        "Development Status :: 4 - Beta",
        "License :: OSI Approved :: Mozilla Public License 2.0 (MPL 2.0)",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    keywords="qaoa quantum maxcut variational",
    license="Mozilla Public License 2.0 (MPL 2.0)",
    zip_safe=False,
    include_package_data=True,
    python_requires=">=3.8",
    install_requires=["numpy >= 1.20", "scipy >= 1.7", "networkx >= 2.6", "pyyaml"],
    packages=["regqaoa"],
    package_data={"regqaoa": ["data/*.yaml"]},
    entry_points={"console_scripts": ["regqaoa=regqaoa.cli:main"]},
)
