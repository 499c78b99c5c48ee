from setuptools import setup, find_packages

setup(
    name="eonhe",
    version="1",
    description="Pulse-level simulator of a quantum register built from electrons floating on liquid helium",
    long_description="""
    This package derives qubit parameters of surface-state electrons on helium
    from electrode geometry, simulates few-qubit register dynamics under
    control schedules, compiles gates to pulses and evaluates decoherence
    and readout estimates.
    """,
    long_description_content_type="text/plain",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    python_requires=">=3.10",
    install_requires=[
        "joblib==1.3.2",
        "numpy==1.26.3",
        "pandas==2.1.4",
        "pytest==8.0.0",
        "scipy==1.12.0",
        "tqdm==4.66.1",
    ],
    entry_points={
        "console_scripts": ["eonhe=eonhe.cli:main"],
    },
)
