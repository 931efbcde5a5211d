#   Copyright Peznauts <kevin@cloudnull.com>. All Rights Reserved.
#
#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.
import glob
import importlib.util
import os
import setuptools


# The package imports numpy on load; read meta without importing it.
_SPEC = importlib.util.spec_from_file_location(
    "noma_rep_meta", os.path.join("noma_rep", "meta.py")
)
meta = importlib.util.module_from_spec(_SPEC)
_SPEC.loader.exec_module(meta)


with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()


REQUIREMENTS = {
    "test": ["black", "coverage", "flake8", "flake8-docstrings"],
}
REQUIREMENTS["all"] = [item for line in REQUIREMENTS.values() for item in line]


setuptools.setup(
    name="noma-rep",
    author=meta.__author__,
    author_email=meta.__email__,
    description=(
        "Outage and finite blocklength error analysis of repetition-based"
        " NOMA with SIC."
    ),
    version=meta.__version__,
    packages=["noma_rep", "noma_rep.tests"],
    include_package_data=True,
    zip_safe=False,
    test_suite="noma_rep.tests",
    install_requires=[
        "numpy>=1.19",
        "pyyaml",
        "scipy>=1.5",
        "tabulate",
    ],
    long_description=long_description,
    long_description_content_type="text/markdown",
    python_requires=">=3.8",
    extras_require=REQUIREMENTS,
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.8",
        "Topic :: Scientific/Engineering",
    ],
    entry_points={
        "console_scripts": [
            "noma-rep = noma_rep.main:main",
        ],
    },
    data_files=[
        (
            "share/noma-rep/experiments",
            [i for i in glob.glob("experiments/*") if os.path.isfile(i)],
        ),
    ],
)
