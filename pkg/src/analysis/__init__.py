# Policy tables, switching checks and slices
