# Unruh geometric phase package
