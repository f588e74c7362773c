# Sphinx configuration for the nlsignal documentation.
# https://www.sphinx-doc.org/en/master/usage/configuration.html
import os
import sys

sys.path.insert(0, os.path.abspath(".."))

import nlsignal  # noqa: E402  pylint: disable=wrong-import-position

project = "nlsignal"
copyright = "2024, nlsignal developers"  # pylint: disable=redefined-builtin
author = "nlsignal developers"
release = nlsignal.__version__

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode", "sphinx.ext.mathjax"]
autodoc_member_order = "bysource"

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "alabaster"
html_static_path = ["_static"]
