"""init module"""
from setuptools import setup

LONG_DESC = open("README.md").read()

setup(
    name="glc",
    version="1.0.0a0",
    description="Checker, evaluators and law tests for a language with guarded loops",
    long_description_content_type="text/markdown",
    long_description=LONG_DESC,
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "License :: OSI Approved :: GNU General Public License v2 (GPLv2)",
        "Natural Language :: English",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python :: 3.10",
    ],
    author="slapelachie",
    author_email="lslape@slapelachie.xyz",
    license="GPLv2",
    packages=["glc"],
    entry_points={"console_scripts": ["glc=glc.__main__:main"]},
    install_requires=["dict2xml", "termcolor>=2.4", "tqdm"],
    extras_require={"test": ["hypothesis"]},
    zip_safe=False,
)
