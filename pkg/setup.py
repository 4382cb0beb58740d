#!/usr/bin/env python

from distutils.core import setup

import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name='pccregions',
    description='Library and CLI tool for computing achievable rate regions '
                'of three-user interference channels with partitioned coset codes',
    version='0.1',
    license='Apache 2.0',
    python_requires='>=3.8',
    packages=setuptools.find_packages(exclude=['tests', 'docs']),
    long_description=long_description,
    long_description_content_type='text/markdown',
    entry_points={"console_scripts": ["pccregions=pccregions.cli:main"]},
    classifiers=[
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Operating System :: OS Independent',
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: Apache Software License',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics'
    ],
    # Also tox.ini
    install_requires=[
        'wrapt<2',
        'fire',
        'prettytable',
        'numpy>=1.20',
        'scipy'
    ],
)
