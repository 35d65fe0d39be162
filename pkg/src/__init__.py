# Relay AoI scheduling toolkit
