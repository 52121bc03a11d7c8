# -*- coding: utf-8 -*-
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
# implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# zocop Release Notes documentation build configuration file.

# -- General configuration ------------------------------------------------

# Add any Sphinx extension module names here, as strings.
extensions = [
    'openstackdocstheme',
    'reno.sphinxext',
]

# Add any paths that contain templates here, relative to this directory.
templates_path = ['_templates']

# The suffix of source filenames.
source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = u'zocop Release Notes'
copyright = u'The zocop Authors'

# The full version, including alpha/beta/rc tags.
from zocop.version import version_info as zocop_version
release = zocop_version.version_string_with_vcs()
# The short X.Y version.
version = zocop_version.canonical_version_string()

# List of patterns, relative to source directory, that match files and
# directories to ignore when looking for source files.
exclude_patterns = []

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'openstackdocs'

# Output file base name for HTML help builder.
htmlhelp_basename = 'zocopReleaseNotesdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    ('index', 'zocopReleaseNotes.tex',
     u'zocop Release Notes Documentation',
     u'The zocop Authors', 'manual'),
]
