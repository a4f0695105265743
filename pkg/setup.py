#!/usr/bin/env python

from setuptools import setup

import zerolimit


setup(name='zerolimit',
      version="{ver}+{rev}".format(
          ver=zerolimit.__version__,
          rev=zerolimit.__revision__,
      ),
      description='Zero distributions of random entire functions: Monte '
                  'Carlo estimates against their large-degree limit',
      long_description=open('README.txt').read(),
      author='zerolimit contributors',
      install_requires=['numpy>=1.17',
                        'scipy>=1.6',
                        'pyzmq>=13.1.0',
                        ],
      extras_require = {'nice': ['psutil>=0.6.1'],
                        'plot': ['matplotlib>=3.0'],
                        },
      packages=['zerolimit',
                'zerolimit.bootstrap',
                'zerolimit.launch',
                ],
      entry_points={
          'console_scripts': ['zerolimit = zerolimit.launcher:main'],
      },
      platforms=['any'],
      keywords=['random polynomials',
                'Gaussian analytic functions',
                'zero distribution',
                'Monte Carlo',
                'zmq',
                ],
      license='LGPL',
      classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Education',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU Library or Lesser General Public '
        'License (LGPL)',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
        ],
     )
