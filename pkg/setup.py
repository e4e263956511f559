from setuptools import setup

setup (name = 'tauber_games',
        version = '0.2',
        description = """Values of zero-sum stochastic games under general
              discounting densities, and Tauberian experiments""",
        long_description=\
      """
        Values of finite zero-sum stochastic games under arbitrary
        discounting densities (Cesaro, Abel, power, piecewise constant),
        computed as rigorous brackets by backward induction, and a
        harness that checks numerically that the value families over
        these densities converge uniformly to one limit.

        * - - - - - - - - - - - - - - - - - - - - - - - - - - - - - -
        *This is free software: you can redistribute it and/or modify
        *it under the terms of version 2 of the GNU Lesser General
        *Public License as published by the Free Software Foundation.
        *Notes:
        *1. Install the 'mpi' extra to distribute sweeps with mpirun
        *2. Install the 'progress' extra for progress bars in verbose runs
        * - - - - - - - - - - - - - - - - - - - - - - - - - - - - - -
         """,
    package_data={'': ['LICENSE']},
        include_package_data=True,

    # Choose your license
    license='LGPL',

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Programming Language :: Python :: 3',
    ],
        python_requires='>=3.8',
        install_requires=['numpy', 'scipy', 'tabulate'],
        extras_require={
            'mpi': ['mpi4py'],
            'progress': ['progressbar2'],
            'test': ['pytest', 'hypothesis'],
        },
        entry_points={
            'console_scripts': ['tauber = tauber_games.cli:main'],
        },
        packages=['tauber_games'],
        )
