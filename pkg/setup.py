# pip install -r requirements.txt to install
# python -m unittest discover -s tests to test

from setuptools import setup
from pathlib import Path

# change here and in __init__.py
version = '0.1.0'

tests_require = ['unittest', 'sly']
install_requires = [
    'jinja2',
    'matplotlib>=3.5',
    'numpy',
    'pandas',
    'psutil',
    'scipy',
    'sly',
    'titlecase',
]


long_description = """rhcplan
=======

Purpose
-------

``rhcplan`` plans motion for an agent on a weighted grid against a hard LTL task (never violated) and a soft LTL task (relaxed at the lowest cost when it cannot be met).
It combines both tasks with the transition system in a relaxed product automaton, measures progress with an energy function and replans over a short receding horizon as obstacles, labels and rewards are sensed.


Installation
------------

::

  pip install .


Dependencies
------------

See requirements.txt.

License
-------

BSD 3 licence

"""

setup(name="rhcplan",
      description="Receding horizon planning with hard and soft LTL constraints.",
      long_description=long_description,
      long_description_content_type='text/x-rst',
      license="BSD",
      version=version,
      packages=['rhcplan', 'rhcplan.extensions'],
      package_data={'': ['*.txt', '*.rst', '*.md', 'scenarios/*.json', 'templates/*.*']},
      tests_require=tests_require,
      install_requires=install_requires,
      entry_points={'console_scripts': ['rhcplan = rhcplan.cli:main']},
      classifiers=[
          'Development Status :: 3 - Alpha',
          'Programming Language :: Python :: 3',
          'License :: OSI Approved :: BSD License',
          'Topic :: Scientific/Engineering :: Mathematics',
          'Intended Audience :: Science/Research',
          'Intended Audience :: Education'
      ],
      )
