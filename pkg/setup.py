# -*- coding: utf-8 -*-
#
# you can install this to a local test virtualenv like so:
#   virtualenv venv
#   ./venv/bin/pip install --editable .
#   ./venv/bin/pip install --editable .[dev]  # with dev requirements, too

from io import open

from setuptools import setup

from activecd import __version__


def read_file(filename, alt=None):
    """
    Read the contents of filename or give an alternative result instead.
    """
    lines = None

    try:
        with open(filename, encoding='utf-8') as f:
            lines = f.read()
    except IOError:
        lines = [] if alt is None else alt
    return lines


long_description = read_file(
    'README.md',
    'Cannot read README.md'
)
requirements = read_file('requirements.txt')
dev_requirements = read_file('requirements-dev.txt')

trove_classifiers = [
    'Development Status :: 3 - Alpha',
    'Environment :: Console',
    'Intended Audience :: Science/Research',
    'Operating System :: OS Independent',
    'Programming Language :: Python :: 3',
    'Programming Language :: Python :: 3.6',
    'Programming Language :: Python :: 3.7',
    'Programming Language :: Python :: 3.8',
    'Programming Language :: Python :: 3.9',
    'Programming Language :: Python :: 3.10',
    'Programming Language :: Python :: Implementation :: CPython',
    'Programming Language :: Python',
    'Topic :: Scientific/Engineering',
]

setup(
    name='activecd',
    version=__version__,

    install_requires=requirements,
    extras_require=dict(
        dev=dev_requirements
    ),

    description='Grant-free activity detection by coordinate descent with '
                'bandit coordinate selection.',
    long_description=long_description,
    long_description_content_type='text/markdown',
    keywords=['activity detection', 'grant-free access', 'massive MIMO',
              'coordinate descent', 'multi-armed bandit'],
    classifiers=trove_classifiers,

    packages=['activecd', 'activecd.test'],
    package_data={'activecd.test': ['fixtures/*/*']},
    python_requires='>=3.6',
    entry_points=dict(
        console_scripts=[
            'activecd=activecd.main:main'
        ]
    ),

    platforms=['any'],
)
