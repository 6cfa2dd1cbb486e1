# SPDX-FileCopyrightText: 2026 tropcount contributors
#
# SPDX-License-Identifier: GPL-3.0-or-later
