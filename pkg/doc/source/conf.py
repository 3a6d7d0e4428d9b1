# Sphinx configuration of the sheartac API documentation.
import os
import sys
sys.path.insert(0, os.path.abspath("../.."))
import sheartac


project = "sheartac"
release = sheartac.__version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "matplotlib.sphinxext.plot_directive",
    "numpydoc",
]

autodoc_default_options = {"member-order": "bysource"}
autosummary_generate = True  # writes doc/source/_autosummary
numpydoc_class_members_toctree = False

intersphinx_mapping = {
    "numpy": ("https://numpy.org/doc/stable/", None),
    "torch": ("https://pytorch.org/docs/stable/", None),
}

exclude_patterns = ["build"]

html_theme = "alabaster"
