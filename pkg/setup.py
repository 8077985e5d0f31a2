from setuptools import setup

import src


setup(
    name=src.__name__,
    version=src.__version__,
    author=src.__author__,
    author_email=src.__email__,
    description=src.__doc__.replace('\n', ' ').strip(),
    license='GPL-3.0+',
    python_requires='>=3.10',
    packages=['Triangle_KTheory'],
    package_dir={'Triangle_KTheory': 'src'},
    test_suite='test',
    install_requires=[
        'numpy>=2.0',
        'pandas>=2.0'
    ],
    entry_points={
        'console_scripts': [
            'triangle-ktheory=Triangle_KTheory.cli:main'
        ]
    }
)
