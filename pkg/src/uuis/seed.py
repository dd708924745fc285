"""Initial data for a fresh store.

The rows below reproduce the legacy production dump, dirty demo data
included (duplicate barcodes, junk owner ids, a self-parented location).
New writes get validated; these rows are grandfathered as-is. Two repairs
were needed where the dump was internally inconsistent: the items table
gains its `code` column (present in the dump's INSERTs but dropped from
its CREATE TABLE) and row 329 (referenced by inventories and
itemproperties) is restored.
"""

SEED_ADMIN_PASSWORD = "teamtwo"

# (affln_id, affln_name, affln_code, parent_id); parent None = university
# root, 0 = faculty, faculty id = department.
AFFILIATIONS = [
    (0, "UUIS", "UUIS", None),
    (1, "Arts and Science", "ASF", 0),
    (2, "Computer Science", "CSF", 0),
    (3, "Engineering", "EN", 0),
    (10, "History", "HIS", 1),
    (11, "Religion", "REL", 1),
    (12, "Visual Arts", "VA", 1),
    (13, "Math", "MA", 1),
    (20, "SOEN", "SOEN", 2),
    (21, "CS", "CS", 2),
    (30, "ECE", "ECE", 3),
    (31, "MIE", "MIE", 3),
]

# (permission_id, description): three capability bits per level.
PERMISSIONS = [
    (1, "reserved for level 0"),
    (2, "reserved for level 0"),
    (4, "reserved for level 0"),
    (8, "reserved for level 1"),
    (16, "reserved for level 1"),
    (32, "reserved for level 1"),
    (64, "reserved for level 2"),
    (128, "reserved for level 2"),
    (256, "reserved for level 2"),
    (512, "reserved for level 3"),
    (1024, "reserved for level 3"),
    (2048, "reserved for level 3"),
]

# (title_id, title_name, permission)
PROFESSIONAL_TITLES = [
    (1, "Inventory staff - Common / administrative", 512),
    (2, "Inventory staff - Per department", 8),
    (3, "Inventory staff - Per faculty", 64),
    (4, "Full-time Faculty", 1),
    (5, "Part-time Faculty", 1),
    (6, "University Administration", 1024),
    (7, "IT Group", 2048),
    (8, "Research assistants", 1),
    (9, "Research associates", 1),
    (10, "Students - diploma", 1),
    (11, "Students - master's thesis option", 1),
    (12, "Students - master's course option", 1),
    (13, "Students - PhD", 1),
    (14, "Security", 1),
]

# (req_type_id, req_type_code, description, permission)
REQUEST_TYPES = [
    (1, "General Request",
     "If you lost an item or found an item and want to check it with the "
     "administrator. Barcode or Serial Number of the item isn't required.", None),
    (2, "Report a problem",
     "If you found there's problem with an item and want to report it to the "
     "administrator. You need to provide the Barcode or Serial Number of the item.", 0),
    (3, "Return back",
     "An item was returned. The barcode or serial number is required.", 0),
    (4, "Moving",
     "An item was moved from one location to another. Barcode or serial number "
     "is required.", 0),
    (5, "Request for",
     "Ask for an item. Barcode or serial number isn't required.", 0),
    (6, "Discard",
     "An item was discard or wtite off. Barcode or serial number is required.", 0),
]

# (bldg_id, bldg_code, bldg_name)
BUILDINGS = [
    (0, "N/A", "N/A"),
    (1, "Hall", "Hall Building"),
    (2, "EV", None),
    (3, "FB", "Fabien"),
    (4, "MB", None),
]

# (cat_id, parent_cat_id, description)
CATEGORIES = [
    (0, "N/A", "N/A"),
    (1, "1", "Computer"),
    (2, "1", "Mouse"),
    (3, None, "Printer"),
]

# (loc_id, parent_loc_id, loc_code, loc_name, bldg_id, affln_id, status,
#  loc_type_id, comment)
LOCATIONS = [
    (1, 1, "H-613", "H-613 Classroom", 1, 1, "available", 1, None),
    (2, 2, "H-627", "H-627 Classroom", 1, 1, "available", 1, None),
    (3, None, "H-011", "H-011 Classromm", None, None, None, None, None),
    (4, None, "EV-011", "EV-011 Classromm", None, None, None, None, None),
    (5, None, "H-833", "On hand Lab", None, None, None, None, None),
    (6, None, "H-866", "Printer Room", None, None, None, None, None),
    (7, None, "MB-011", "MB.011 Classromm", None, None, None, None, None),
]

# (item_id, item_description, code, group_id, serial_number, cat_id,
#  owner_id, loc_id, date_modified, status)
ITEMS = [
    (0, "N/A", "N/A", 576, "N/A", 0, 0, 3, "2010-05-02 19:50:24", "stolen"),
    (3, "desktop", "UUIS000001", 333, "abcdefg", 1, 1, 1, "0000-00-00 00:00:00", "inactive"),
    (4, "Dell00001", "UUIS000002", 5555555, "abcdefg", 2, 1, 2, "0000-00-00 00:00:00", "inactive"),
    (5, "aa", "aa", 576, "aa", 1, 0, 3, "2010-05-02 19:50:24", "stolen"),
    (6, "desktop", "UUIS000001", 5555555, "abcdefg", 1, 1, 1, "0000-00-00 00:00:00", "inactive"),
    (7, "demo1", "DEMO0001", 5555555, "1000demo", 2, 0, 1, "0000-00-00 00:00:00", "inactive"),
    (8, "demo2", "DEMO0001", 576, "2000demo", 2, 0, 3, "2010-05-02 19:50:24", "stolen"),
    (9, "demo3", "DEMO0003", 0, "3000demo", 2, 0, 1, "0000-00-00 00:00:00", "inactive"),
    (10, "demo4", "DEMO0004", 0, "4000demo", 2, 0, 3, "0000-00-00 00:00:00", "inactive"),
    (11, "demo5", "DEMO0005", 2147483647, "5000demo", 2, 0, 3, "2010-05-02 20:14:13", "active"),
    (12, "demo6", "DEMO0006", 2147483647, "6000demo", 2, 0, 1, "0000-00-00 00:00:00", "inactive"),
    (13, "demo7", "DEMO0007", 0, "7000demo", 2, 0, 2, "0000-00-00 00:00:00", "stolen"),
    (14, "demo8", "DEMO0008", 0, "8000demo", 2, 0, 2, "0000-00-00 00:00:00", "stolen"),
    (15, "demo10", "DEMO00010", 0, "10000demo", 2, 0, 2, "0000-00-00 00:00:00", "stolen"),
    (16, "demo3", "DEMO0003", 0, "3000demo", 2, 0, 2, "0000-00-00 00:00:00", "stolen"),
    (17, "333333333", "333333333", 2147483647, "33333333", 1, 333333, 2, "0000-00-00 00:00:00", "stolen"),
    (18, "qqqqq", "qqqqq", 0, "qqqq", 1, 0, 1, "0000-00-00 00:00:00", "active"),
    (19, "", "", 0, " ", 0, 0, 0, "0000-00-00 00:00:00", ""),
    (20, "Dell tower 1", "UUIS000002", None, "a0002", 1, 3, 3, "2010-05-02 13:37:34", None),
    (21, "Dell tower 2", "UUIS000003", None, "a0003", 1, 21, 4, "2010-05-02 13:37:34", None),
    (22, "Dell tower 3", "UUIS000004", None, "a0004", 1, 20, 5, "2010-05-02 13:37:34", None),
    (23, "Marker", "UUIS000005", None, "a0005", 3, 21, 6, "2010-05-02 13:37:34", None),
    (24, "66666", "66666", 66666, "666666 ", 2, 6666, 4, "0000-00-00 00:00:00", "active"),
    (25, "uuuu", "uuuu", 0, "uuuu ", 1, 0, 1, "0000-00-00 00:00:00", "active"),
    (27, "999", "999", 999, "999", 1, 999, 2, "0000-00-00 00:00:00", "lent"),
    (28, "22222", "22222", 22222, "22 ", 1, 222222, 2, "0000-00-00 00:00:00", "inactive"),
    (30, "", "", 0, "2222DEMO", 0, 0, 0, "0000-00-00 00:00:00", ""),
    (31, "Table1", "", 0, "11111DEMO", 1, 0, 2, "0000-00-00 00:00:00", "active"),
    (32, "speaker", "DEMO0002022", 3, "222222DEMO", 1, 222, 0, "2010-05-02 00:08:26", ""),
    (33, "mobile", "DEMO33333", 5, "222222DEMO", 1, 433, 2, "2010-05-02 00:17:03", "active"),
    (34, "desktop Dell 1", "UUIS000001", None, "a0001", None, None, None, None, None),
    (35, "ppppp", "DEMO234445", 5, "6778899DEMO", 1, 555, 2, "2010-05-02 18:37:30", "active"),
    (36, "wwww", "DEMOwwww", 3, "wwwwwDEMO", 1, 2222, 2, "2010-05-02 18:36:46", "inactive"),
    (329, "Dell tower 4", "UUIS000006", None, "a0006", 1, 0, 5, "2010-05-02 13:37:34", None),
]

# (item_id, qty, status, modified_by, date_modified)
INVENTORIES = [
    (20, 2, None, None, None),
    (21, 3, None, None, None),
    (22, 4, None, None, None),
    (23, 5, None, None, None),
    (329, 1, None, None, None),
]

# (prop_id, cat_id, prop_name, default_value, required, numeric_cap_of)
ITEM_PROPERTY_LIST = [
    (1, 1, "Desktop", None, 0, None),
    (2, 3, "Desktop Laser", None, 0, None),
]

# (item_prop_id, item_id, prop_id, prop_value)
ITEM_PROPERTIES = [
    (1, 20, 1, "Dell9000"),
    (2, 21, 1, "Dell9000"),
    (3, 22, 1, "Dell9000"),
    (4, 23, 2, "HP 4200"),
    (5, 329, 1, "Dell9000"),
]

# Single bootstrap account; its password is hashed at initialization.
ADMIN_USER = (1, "admin", "System", "Administrator", "2010-04-22 02:14:42")
ADMIN_ROLE = (1, 1, 1, 0, None)     # (user_role_id, user_id, title_id, affln_id, status)
ADMIN_ACL = (1, 2048)               # role override: IT-group capability bit
