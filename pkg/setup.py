"""Setup script of bertini-sieve"""
import os.path
from setuptools import setup
from setuptools import find_packages

import bertini_sieve

with open(os.path.join(os.path.dirname(__file__), 'README.rst')) as readme:
    README = readme.read()

os.chdir(os.path.normpath(os.path.join(os.path.abspath(__file__), os.pardir)))

setup(
    name='bertini-sieve',
    version=bertini_sieve.__version__,
    packages=find_packages(exclude=['tests']),
    include_package_data=True,
    license=bertini_sieve.__license__,
    description='Probabilities of Taylor conditions on hypersurface sections over finite fields',
    long_description=README,
    url=bertini_sieve.__url__,
    author=bertini_sieve.__author__,
    author_email=bertini_sieve.__email__,
    keywords='finite fields, bertini, hypersurfaces, zeta function, sieve',
    classifiers=[
        'Framework :: Django',
        'Environment :: Console',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'License :: OSI Approved :: BSD License',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    python_requires='>=3.8',
    install_requires=[
        'django>=3.2',
        'tornado',
        'numpy',
        'galois',
        'sympy',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': [
            'bertini-sieve=bertini_sieve.management:execute_from_command_line',
        ],
    },
)
