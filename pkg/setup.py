#!/usr/bin/env python
# -*- coding: utf-8 -*-

import re

from setuptools import setup, find_packages

with open('wagner/__init__.py') as f:
    version = re.search(r"__version__ = '([^']+)'", f.read()).group(1)

requirements = [
    'numpy',
    'protobuf'
]

test_requirements = [
    'pytest',
    'hypothesis'
]

setup(
    name='wagner',
    version=version,
    description='Truncated metric connections and Wagner curvature of contact sub-Finsler structures',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['docs', 'tests', 'manifests']),
    include_package_data=True,
    install_requires=requirements,
    extras_require={'test': test_requirements},
    entry_points={
        'console_scripts': ['wagner=wagner.cli:main'],
    },
    python_requires='>=3.7',
    license='MIT license',
    zip_safe=False,
    test_suite='tests',
    tests_require=test_requirements
)
