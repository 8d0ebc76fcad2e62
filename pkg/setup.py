# !/usr/bin/env python

import os
import sys

from setuptools import setup, find_packages

if sys.argv[-1] == 'publish':
    os.system("python setup.py sdist upload")
    sys.exit()

install_requires = [
    'click',
    'networkx',
    'numpy',
]

setup(name='acx',
      version='0.1.0',
      description='A workbench that checks which expressiveness-simulation properties a mapping between access control systems satisfies.',
      long_description='acx represents access control systems as finite state machines, maps one system onto another with declarative rules, and checks the simulation properties of the mapping by bounded exhaustive exploration. It also ships the property lattice and a catalog of surveyed simulations.',
      packages=find_packages(exclude=['tests']),
      install_requires=install_requires,
      extras_require={
          'test': ['pytest', 'hypothesis'],
      },
      entry_points={
          'console_scripts': ['acx = acx.cli:main'],
      },
      package_data={'acx': ['corpus/*.json']},
      classifiers=[
          'Development Status :: 3 - Alpha',
          'Operating System :: MacOS',
          'Operating System :: POSIX :: Linux',
          'Topic :: Security',
          'License :: OSI Approved :: MIT License',
          'Programming Language :: Python :: 3.8',
      ],
      include_package_data=True,
      )
