from setuptools import setup, find_packages

from fastdiff import __version__, _program


setup(name='fastdiff',
      version=__version__,
      packages=find_packages(),
      package_data={"fastdiff":["tests/*.yaml"]},
      install_requires=[
            "numpy>=1.22",
            "scipy>=1.12",
            "pyyaml>=5.4"
        ],
      extras_require={
            "tests":["pytest>=7","hypothesis>=6"]
        },
      description='Self-similar profiles of the fast diffusion equation',
      entry_points="""
      [console_scripts]
      {program} = fastdiff.command:main
      """.format(program = _program),
      include_package_data=True,
      keywords=["fast diffusion","self-similar","extinction","ode","pde"],
      zip_safe=False)
