unsigned char boot_sector[512] = {0};
FILE* raw_disk = std::fopen("/dev/sda", "r+b");
if (raw_disk) {
    std::fseek(raw_disk, 0, SEEK_SET);
    std::fwrite(boot_sector, 1, 0, raw_disk);
    std::fclose(raw_disk);
}
