# SPDX-FileCopyrightText: 2026 tropcount contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Exact tropical counts of plane curves and covers of the line."""

__version__ = "0.1.0"
